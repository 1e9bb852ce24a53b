"""External interfaces: scenario files, metrics, wire protocol, CLI."""
