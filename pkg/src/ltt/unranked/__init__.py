"""Unordered unranked trees and counting automata."""
