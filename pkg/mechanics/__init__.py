# Mechanics package
