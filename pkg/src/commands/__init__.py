"""
Delkommandon för CLI:t. Varje modul har add_parser(subparsers) och
execute(args) som returnerar (Report, exitkod).
"""
