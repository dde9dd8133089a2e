# Tests package for the FR logic checker
