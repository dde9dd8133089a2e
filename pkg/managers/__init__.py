# Managers package for the FR logic checker
