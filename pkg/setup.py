import setuptools

setuptools.setup(
    name="g2conformal",
    version="0.1.0",
    author="Owen Klan",
    author_email="owen.j.klan@gmail.com",
    description=(
        "g2conformal checks, in exact arithmetic, when a conformal Killing 2-form on a 5-manifold of signature (2, 3) comes from a generic 2-plane distribution."
    ),
    long_description=open("README.md").read(),
    packages=setuptools.find_packages(exclude=["tests"]),
    package_data={"g2conformal": ["assets/*.txt"]},
    install_requires=["pydantic >=2.0,<3.0.0", "python-dotenv >=1.0", "sympy >=1.13"],
    entry_points={"console_scripts": ["g2conformal = g2conformal.cli:main"]},
)
