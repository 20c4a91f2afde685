"""
Command-line interface for the separability certifier (python -m cli.main)
"""
