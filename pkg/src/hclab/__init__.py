"""Numerical laboratory for mixed kernel/biorthogonal systems in Paley-Wiener and de Branges spaces."""
