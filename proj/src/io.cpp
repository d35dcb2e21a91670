namespace mn {}
