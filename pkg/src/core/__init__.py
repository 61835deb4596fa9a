"""Exact supercommutative algebra, the nu involution, supermatrices and the expression parser"""
