"""Project configuration: engine budgets and logging."""
