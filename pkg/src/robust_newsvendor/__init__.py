"""
Robust multi-item newsvendor under mean-MAD-range demand ambiguity
"""
