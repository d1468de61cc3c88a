"""semihilbert-lab: kompositionsoperatorer på semi-Hilbertrum"""
