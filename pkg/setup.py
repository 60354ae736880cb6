from setuptools import setup, find_packages

setup(
    name="hyperdyn",
    version="0.1.0",
    description="Periodic non-autonomous dynamical systems on finite metric spaces and their hyperspace lifts",
    author="Your Name",
    packages=find_packages(where="src"),
    package_dir={"": "src"},
    install_requires=[
        "python-dotenv>=1.0.0",
        "click>=8.1.0",
        "rich>=13.7.0",
        "pandas>=2.1.0",
        "numpy>=1.24.0",
        "networkx>=3.1",
        "python-sat>=0.1.8.dev13",
        "python-json-logger>=2.0.7",
    ],
    extras_require={
        "test": [
            "pytest>=8.0.0",
            "hypothesis>=6.100.0",
        ],
    },
    entry_points={
        "console_scripts": [
            "hyperdyn=hyperdyn.cli:main",
        ],
    },
    python_requires=">=3.9",
)
