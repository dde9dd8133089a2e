# Models package for the FR logic checker
