# Profiles package
