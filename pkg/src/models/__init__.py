# poisson-deform I/O models
