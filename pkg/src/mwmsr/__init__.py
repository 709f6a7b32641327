"""Multi-hop weighted MSR resilient consensus."""
