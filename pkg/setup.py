from setuptools import setup, find_packages

setup(
    name="schurext",
    version="0.1",
    packages=find_packages(exclude=["tests", "tests.*"]),
    install_requires=[
        "networkx==3.2.1",
        "numpy>=1.21.0",
    ],
    entry_points={
        "console_scripts": ["schurext=src.main:main"],
    },
    python_requires=">=3.8",
)
