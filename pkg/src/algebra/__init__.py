# poisson-deform polynomial and multiderivation algebra
