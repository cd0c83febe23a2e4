"""
Pydantic models module
"""
