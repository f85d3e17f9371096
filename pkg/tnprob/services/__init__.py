"""Services for file storage, training runs and verification."""
