# Core utilities: configuration, logging setup and the error hierarchy
