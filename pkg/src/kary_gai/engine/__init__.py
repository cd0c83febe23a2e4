"""
kary-gai engine - exact toolkit for 2-additive GAI models and k-ary capacities
"""
