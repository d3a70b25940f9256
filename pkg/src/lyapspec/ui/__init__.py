# Command line and figure rendering
