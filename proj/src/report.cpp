namespace supermech {}
