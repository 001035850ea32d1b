"""
Subcommand modules; each exposes register(subparsers, common)
"""
