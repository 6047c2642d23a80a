# Tests for the circle Poisson lab
