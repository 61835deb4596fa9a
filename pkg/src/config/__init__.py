"""Configuration package for nugrass"""
