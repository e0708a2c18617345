#!/usr/bin/env python3
"""
Database Initialization Script
Creates the classifier registry tables (classifiers, evaluations)
"""

from dotenv import load_dotenv
load_dotenv()

from app.database import init_db
from app.settings import DATABASE_URL


def main():
    print(f"Initializing classifier registry at {DATABASE_URL} ...")
    init_db()
    print("Registry tables created.")
    print("\nYou can now:")
    print("  1. Register a model: python3 main.py train-wishart ... --register NAME")
    print("  2. Start the API:    python3 main.py serve")
    print("  3. View API docs:    http://127.0.0.1:8000/docs")


if __name__ == "__main__":
    main()
