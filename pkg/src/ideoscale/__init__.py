"""Direct elicitation of ideological scales from chat-completion models."""
__version__ = "0.1.0"
