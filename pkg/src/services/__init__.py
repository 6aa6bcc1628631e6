# poisson-deform computational services
