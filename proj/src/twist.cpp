// placeholder: filled in as the module lands
