# Persistence: map files and artifact writers
