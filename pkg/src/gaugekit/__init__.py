"""Desk-scale numerical gauge theory."""
