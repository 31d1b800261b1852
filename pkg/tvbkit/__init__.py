# Package marker for tvbkit
