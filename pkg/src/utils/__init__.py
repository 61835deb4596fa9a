"""Utilities package for nugrass"""
