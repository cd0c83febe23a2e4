"""
Services module
"""
