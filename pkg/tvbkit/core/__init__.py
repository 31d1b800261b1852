# Package marker for tvbkit.core
