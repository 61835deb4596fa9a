"""nu-Grassmannians, super vector bundles, Gauss morphisms, homotopies and towers"""
