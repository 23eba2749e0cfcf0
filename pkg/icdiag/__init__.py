"""icdiag : entropies généralisées, diagrammes d'information et relations d'incertitude."""

__version__ = "1.0.0"
