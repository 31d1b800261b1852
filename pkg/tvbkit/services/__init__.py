# Package marker for tvbkit.services
