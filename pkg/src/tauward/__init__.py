"""Dispersionless tau function, Ward identities and genus-g partition sums."""
