# Asymptotic package
