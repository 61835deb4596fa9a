"""Handlers package for nugrass"""
