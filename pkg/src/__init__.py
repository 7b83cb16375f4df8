# Flow residue engine package
