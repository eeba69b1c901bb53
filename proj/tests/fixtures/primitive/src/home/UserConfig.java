package home;

import java.io.File;

class UserConfig {
    File open() {
        String username = getCurrentUserName();
        String path = "/home/"+username+"/user.cfg";
        // Unsafe path: extra check is needed!
        File config = new File(path);
        return config;
    }

    String getCurrentUserName() {
        return System.getProperty("user.name");
    }
}
