# poisson-deform
