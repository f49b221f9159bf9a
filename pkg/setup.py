from setuptools import setup

setup(
    name="belyilab",
    packages=["belyilab"],
    package_dir={"": "src"},
    package_data={"belyilab": ["schema"]},
    python_requires=">=3.8",
    install_requires=["numpy>=1.22", "scipy>=1.9"],
    extras_require={"test": ["hypothesis"]},
    entry_points={"console_scripts": ["belyilab=belyilab.cli:main"]},
)
