"""
kg-walk-qa: question answering over knowledge graphs with verbalized walks.

Usage:
    python app.py build --graph movies.tsv --traversal bfs --depth 2
    python app.py query --question "who directed Inception" --mock-llm echo
"""
import sys

from dotenv import load_dotenv

# Load environment variables
load_dotenv()

from src.cli import main  # noqa: E402

if __name__ == "__main__":
    sys.exit(main())
