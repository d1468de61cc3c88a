"""Kärnmoduler: måttrum, operatorer, A-relativ maskineri, kriterier och rapporter"""
