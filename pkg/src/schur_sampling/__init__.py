"""Classical simulation of SU(2) quantum Schur sampling circuits."""
