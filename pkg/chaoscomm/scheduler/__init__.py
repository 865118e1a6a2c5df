"""Thread-pool scheduling for independent experiment tasks."""
