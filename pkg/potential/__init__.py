# Potential package
