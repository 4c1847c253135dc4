"""
packlab Version Information
"""

version = "1.0.0"
build_date = "2026-10-19"


def get_version_info():
    """Get detailed version information"""
    return {
        "version": version,
        "build_date": build_date,
        "features": [
            "Exact Intersection Lattices",
            "d_Omega Closed Forms and Boxed Search",
            "Exceptional Class Enumeration",
            "Packing Fractions and Packing Numbers",
            "JSON/Table Command Line",
        ],
    }
