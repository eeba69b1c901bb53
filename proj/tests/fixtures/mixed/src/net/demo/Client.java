package net.demo;

import java.io.File;
import java.net.Socket;
import java.util.List;

public class Client {
    private String serverHost = "localhost";
    private int serverPort;

    public Client(int port) {
        serverPort = port;
    }

    Socket connect() throws Exception {
        return new Socket(serverHost, serverPort);
    }

    void saveAll(List<String> names, File baseDir) {
        for (String name : names) {
            File target = new File(baseDir, name + ".txt");
            target.delete();
        }
        names.forEach(n -> new File(n));
    }

    String nothingHere(String s) {
        return s.trim().toLowerCase();
    }
}
