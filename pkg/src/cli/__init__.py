# poisson-deform CLI
