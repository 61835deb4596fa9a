"""CLI package for nugrass"""
