# defekt: singularities, defect and finite-field census of projective hypersurfaces
__version__ = "0.4.0"
